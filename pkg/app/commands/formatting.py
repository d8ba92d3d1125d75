import pandas as pd


def significant(x: float) -> str:
    """Six significant digits, '.' decimal separator whatever the locale."""
    text = f"{x:.6g}"
    return "0" if text == "-0" else text


def best_estimate_text(x: float) -> str:
    return f"{x:.5f}"


def to_csv(frame: pd.DataFrame) -> str:
    return frame.to_csv(index=False, lineterminator="\n")
