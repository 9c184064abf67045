def strtobool(value: str) -> bool:
    return value.lower() in ("y", "yes", "t", "true", "on", "1")


def format_float(value: float) -> str:
    """17 significant digits, enough for an exact round trip of a double."""
    return format(float(value), ".17g")


def parse_range(text: str) -> list[float]:
    """Parse ``start:stop:step`` (stop inclusive up to rounding) or a comma-separated list."""
    text = text.strip()
    if ":" in text:
        parts = text.split(":")
        if len(parts) != 3:
            raise ValueError(f"range must look like start:stop:step, got {text!r}")
        start, stop, step = (float(p) for p in parts)
        if step <= 0 or stop < start:
            raise ValueError(f"range {text!r} needs a positive step and stop >= start")
        count = int((stop - start) / step + 1e-9) + 1
        return [round(start + i * step, 12) for i in range(count)]
    values = [float(v) for v in text.split(",") if v.strip()]
    if not values:
        raise ValueError(f"no values in {text!r}")
    return values
