"""Surface builders, collar charts and Dirichlet domains."""
