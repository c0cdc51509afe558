"""Exception hierarchy shared across the stack.

Contract reverts carry a machine-readable ``reason`` that survives into
receipts and HTTP error bodies, so clients can match on it without parsing
prose.
"""


class NftMarketError(Exception):
    """Base class for all errors raised by this package."""


class ValidationError(NftMarketError):
    """Malformed input rejected before any state change."""


class BadSignature(NftMarketError):
    pass


class NonceMismatch(NftMarketError):
    pass


class UnknownSender(NftMarketError):
    pass


class NotFound(NftMarketError):
    pass


class IntegrityFailure(NftMarketError):
    """Stored bytes no longer hash to their CID: the store is corrupt."""


class ChallengeError(NftMarketError):
    """Base for wallet-connect challenge failures."""


class ChallengeExpired(ChallengeError):
    pass


class ChallengeAlreadyUsed(ChallengeError):
    pass


class UnknownChallenge(ChallengeError):
    pass


class ContractRevert(NftMarketError):
    """A transaction failed inside contract execution.

    Never escapes the ledger: it is converted into a Reverted receipt.
    ``reason`` is one of the fixed strings below.
    """

    def __init__(self, reason: str):
        super().__init__(reason)
        self.reason = reason


# Fixed revert reason strings (mirrored verbatim in API bodies).
ZERO_PRICE = "ZeroPrice"
UNKNOWN_URI = "UnknownUri"
METADATA_INVALID = "MetadataInvalid"
NOT_LISTED = "NotListed"
SELF_PURCHASE = "SelfPurchase"
WRONG_PAYMENT = "WrongPayment"
INSUFFICIENT_FUNDS = "InsufficientFunds"
UNKNOWN_TOKEN = "UnknownToken"


class ProviderUnavailable(NftMarketError):
    """Remote image provider failed or timed out."""

    def __init__(self, msg: str, retry_after_s: float | None = None):
        super().__init__(msg)
        self.retry_after_s = retry_after_s


class DecodeFailure(NftMarketError):
    """Remote provider returned something that is not an image."""
