"""Mean-field belief dynamics: stationary and transient solvers plus an agent simulator."""
