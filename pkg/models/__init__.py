# Data types: fiber algebra, operators, metrics, models, transforms
