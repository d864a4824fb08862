"""
electrovac - verification lab for conformally flat electrostatic systems

This package contains:
- shared/: Run state, utilities, errors and run configuration
- core/: Jets, invariants, conformal operators, residuals, solution families
- verifier/: Sampling, residual aggregation, reports and diagnostics
- reducer/: Quadrature, Runge-Kutta integration and ODE reductions
- supervisor.py: Command router
- cli.py: Command-line front-end
"""

from .supervisor import supervisor_graph, run_supervisor

__all__ = ["supervisor_graph", "run_supervisor"]
