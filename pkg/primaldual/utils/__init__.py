"""Readers and writers for problem, instance and solution files"""
