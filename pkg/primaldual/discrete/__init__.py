"""LP duality certificates and the set-cover primal-dual schema"""
from .lp_duality import (
    ApproximationCertificate, Certificate, LpProblem, Violation, approximation_certificate,
    check_feasible, check_slackness, dualize_lp,
)
from .setcover import (
    SetCoverInstance, SetCoverResult, cover_lp, f_max, solve_setcover, verify_cover,
)
