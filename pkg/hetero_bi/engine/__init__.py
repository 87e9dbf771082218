# Numerical core: kernels, potentials, weights, actions, surgeries, solvers.
