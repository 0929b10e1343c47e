class DataError(ValueError):
    """Invalid input data (bad file contents, shape/range violations).

    CLI maps this to exit code 2, as opposed to usage errors (exit 1).
    """
