"""Global safety cap on enumeration sizes (GRAINNET_MAX_STATES)."""
import os

from .errors import PreconditionError

DEFAULT_MAX_STATES = 100000


class StateCapExceeded(PreconditionError):
    pass


def max_states() -> int:
    raw = os.environ.get("GRAINNET_MAX_STATES")
    if not raw:
        return DEFAULT_MAX_STATES
    try:
        return int(raw)
    except ValueError:
        return DEFAULT_MAX_STATES


def check_cap(count: int, what: str) -> None:
    cap = max_states()
    if count > cap:
        raise StateCapExceeded(f"{what}: more than {cap} states (raise GRAINNET_MAX_STATES to allow more)")
