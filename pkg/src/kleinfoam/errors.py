"""Exception type shared by every module.

Each error carries a stable ``code`` string (``E_PARSE``, ``E_INVALID_FOAM``,
...) so callers and the CLI can dispatch on it without string matching.
"""


class FoamError(Exception):
    def __init__(self, code: str, message: str = ""):
        super().__init__(f"{code}: {message}" if message else code)
        self.code = code
        self.message = message


# codes that map to CLI exit code 2 (input could not be parsed)
PARSE_CODES = frozenset({"E_PARSE", "E_BAD_MATRIX", "E_MISSING_GENERATOR"})
# codes that map to exit code 3 (resource bound exceeded)
BOUND_CODES = frozenset({"E_BOUND_EXCEEDED", "E_LIMIT"})
