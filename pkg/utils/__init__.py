# Numerical helpers and writers
