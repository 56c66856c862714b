"""
Mathematical core: polynomial field, system registry, bi-Hamiltonian and conformal constructions
"""
