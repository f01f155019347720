"""
Primal-Dual Optimization Toolkit
================================

Proximal calculus, convex primal-dual splitting solvers, LP duality
certificates, the set-cover primal-dual schema and MRF dual decomposition.

Features:
- Prox catalog with Fenchel-conjugate calculus and Moreau decomposition
- Seven primal-dual solvers with convergence-condition guards and KKT traces
- LP complementary-slackness and approximation certificates
- Set-cover primal-dual schema with its F_max guarantee
- MRF dual decomposition, tree min-sum and max-flow graph cuts
- Batch command-line front end (``python -m primaldual``)
"""

__version__ = '1.0.0'
