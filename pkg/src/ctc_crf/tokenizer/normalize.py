import re
import unicodedata

WORD_BOUNDARY = "▁"

_CONTROL = re.compile(r"[\x00-\x1f\x7f]")


def normalize_text(text: str) -> str:
    """NFKC + lowercase; control characters and the boundary marker are removed."""
    if not text:
        return ""

    text = unicodedata.normalize("NFKC", text).lower()
    text = _CONTROL.sub(" ", text)
    text = text.replace(WORD_BOUNDARY, " ")

    # Normalize whitespace
    text = re.sub(r"\s+", " ", text)
    return text.strip()


def normalize_word(word: str) -> str:
    return normalize_text(word).replace(" ", "")
