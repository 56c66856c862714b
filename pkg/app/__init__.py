"""
Resistive-Hamiltonian toolkit
Exact verification and simulation of three-dimensional non-conservative Hamiltonian systems
"""
