# Settings, logging and run defaults
