from .logger import Logger

# Process-wide logger handle. main() replaces it after validating LOG_FILE;
# library code imported on its own (tests, notebooks) logs through this default.
logger: Logger = Logger()
