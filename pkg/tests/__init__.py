# Test suites, one per module
