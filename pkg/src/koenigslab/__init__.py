"""Königs and Böttcher conjugacy maps on truncated Dirichlet and Taylor series."""
