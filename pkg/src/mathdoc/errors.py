"""Common error base for all mathdoc modules.

Every domain error carries a stable ``code`` string so the HTTP layer
can map exceptions to error envelopes without string matching.
"""


class DomainError(Exception):
    """Base class for all domain-level failures."""

    code = "domain_error"

    def __init__(self, message: str, **detail):
        super().__init__(message)
        self.message = message
        self.detail = dict(detail)

    def __str__(self):
        return self.message
