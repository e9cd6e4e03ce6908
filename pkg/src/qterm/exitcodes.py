EXIT_VALID = 0
EXIT_KEYBOARD = 1
# Invalid command lines share the input error code so that scripts only need
# to check for 2.
EXIT_CLI = 2
EXIT_INPUT_FORMAT = 2
EXIT_ITERATION_CAP = 3
EXIT_NO_WITNESS = 4
EXIT_INPUT_NOT_FOUND = 66
EXIT_UNKNOWN = 70
EXIT_SYSERR = 71
EXIT_CANT_OUTPUT = 73
