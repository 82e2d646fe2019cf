import hashlib
import json


def generate_fingerprint(payload: dict) -> str:
    """Deterministic 48-character fingerprint of a canonical JSON payload"""
    canonical = json.dumps(payload, sort_keys=True, separators=(",", ":"))
    return hashlib.sha256(canonical.encode()).hexdigest()[:48]
