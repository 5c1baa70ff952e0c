"""Lexicon and rule-based sentiment scorer producing a compound valence.

Implements the published VADER algorithm (Hutto & Gilbert) from its public
description: token valences from a lexicon file, modified by degree adverbs,
negation within a three-token window, all-caps emphasis, contrastive "but"
weighting, a handful of idioms, and punctuation amplification, then squashed
into a compound score in [-1, 1] with the standard alpha=15 normalization.

The shipped lexicon is a curated subset oriented to campus-survey language;
any file of ``token<TAB>mean_valence`` lines (the canonical four-column
lexicon format also works, extra columns are ignored) can be substituted via
the ``lexicon_path`` argument.
"""

from __future__ import annotations

import math
import string
from importlib import resources
from pathlib import Path

B_INCR = 0.293
B_DECR = -0.293
C_INCR = 0.733
N_SCALAR = -0.74
NORMALIZE_ALPHA = 15.0

NEGATE = {
    "aint", "arent", "cannot", "cant", "couldnt", "darent", "didnt", "doesnt",
    "ain't", "aren't", "can't", "couldn't", "daren't", "didn't", "doesn't",
    "dont", "hadnt", "hasnt", "havent", "isnt", "mightnt", "mustnt", "neither",
    "don't", "hadn't", "hasn't", "haven't", "isn't", "mightn't", "mustn't",
    "neednt", "needn't", "never", "none", "nope", "nor", "not", "nothing",
    "nowhere", "oughtnt", "shant", "shouldnt", "uhuh", "wasnt", "werent",
    "oughtn't", "shan't", "shouldn't", "uh-uh", "wasn't", "weren't",
    "without", "wont", "wouldnt", "won't", "wouldn't", "rarely", "seldom",
    "despite",
}

BOOSTER_DICT = {
    "absolutely": B_INCR, "amazingly": B_INCR, "awfully": B_INCR,
    "completely": B_INCR, "considerable": B_INCR, "considerably": B_INCR,
    "decidedly": B_INCR, "deeply": B_INCR, "effing": B_INCR,
    "enormous": B_INCR, "enormously": B_INCR, "entirely": B_INCR,
    "especially": B_INCR, "exceptional": B_INCR, "exceptionally": B_INCR,
    "extreme": B_INCR, "extremely": B_INCR, "fabulously": B_INCR,
    "flipping": B_INCR, "flippin": B_INCR, "frackin": B_INCR,
    "fracking": B_INCR, "fricking": B_INCR, "frickin": B_INCR,
    "frigging": B_INCR, "friggin": B_INCR, "fully": B_INCR,
    "fucking": B_INCR, "fuckin": B_INCR, "greatly": B_INCR, "hella": B_INCR,
    "highly": B_INCR, "hugely": B_INCR, "incredible": B_INCR,
    "incredibly": B_INCR, "intensely": B_INCR, "major": B_INCR,
    "majorly": B_INCR, "more": B_INCR, "most": B_INCR,
    "particularly": B_INCR, "purely": B_INCR, "quite": B_INCR,
    "really": B_INCR, "remarkably": B_INCR, "so": B_INCR,
    "substantially": B_INCR, "thoroughly": B_INCR, "total": B_INCR,
    "totally": B_INCR, "tremendous": B_INCR, "tremendously": B_INCR,
    "uber": B_INCR, "unbelievably": B_INCR, "unusually": B_INCR,
    "utter": B_INCR, "utterly": B_INCR, "very": B_INCR,
    "almost": B_DECR, "barely": B_DECR, "hardly": B_DECR,
    "just enough": B_DECR, "kind of": B_DECR, "kinda": B_DECR,
    "kindof": B_DECR, "kind-of": B_DECR, "less": B_DECR, "little": B_DECR,
    "marginal": B_DECR, "marginally": B_DECR, "occasional": B_DECR,
    "occasionally": B_DECR, "partly": B_DECR, "scarce": B_DECR,
    "scarcely": B_DECR, "slight": B_DECR, "slightly": B_DECR,
    "somewhat": B_DECR, "sort of": B_DECR, "sorta": B_DECR,
    "sortof": B_DECR, "sort-of": B_DECR,
}

SPECIAL_CASES = {
    "the shit": 3.0, "the bomb": 3.0, "bad ass": 1.5, "badass": 1.5,
    "bus stop": 0.0, "yeah right": -2.0, "kiss of death": -1.5,
    "to die for": 3.0, "beating heart": 3.1, "broken heart": -2.9,
}

_PUNCTUATION = string.punctuation

DEFAULT_LEXICON_RESOURCE = "sentiment_lexicon.txt"


class LexiconError(Exception):
    """The sentiment lexicon file is missing or malformed."""


def load_lexicon(path: str | Path | None = None) -> dict[str, float]:
    """Read a ``token<TAB>valence`` lexicon; extra tab-separated columns are ignored."""
    if path is None:
        source = resources.files("surveyloop.data").joinpath(DEFAULT_LEXICON_RESOURCE)
        text = source.read_text(encoding="utf-8")
    else:
        try:
            text = Path(path).read_text(encoding="utf-8")
        except OSError as exc:
            raise LexiconError(f"cannot read sentiment lexicon {path}: {exc}") from exc
    lexicon: dict[str, float] = {}
    for lineno, line in enumerate(text.splitlines(), start=1):
        if not line.strip():
            continue
        fields = line.split("\t")
        if len(fields) < 2:
            raise LexiconError(f"lexicon line {lineno}: expected token<TAB>valence")
        try:
            lexicon[fields[0]] = float(fields[1])
        except ValueError as exc:
            raise LexiconError(f"lexicon line {lineno}: bad valence {fields[1]!r}") from exc
    return lexicon


def normalize(score: float, alpha: float = NORMALIZE_ALPHA) -> float:
    """Squash an additive valence sum into [-1, 1]."""
    norm = score / math.sqrt(score * score + alpha)
    return max(-1.0, min(1.0, norm))


def _strip_punc_if_word(token: str) -> str:
    # Edge punctuation is removed unless doing so leaves fewer than three
    # characters, which keeps emoticons such as ":)" intact.
    stripped = token.strip(_PUNCTUATION)
    if len(stripped) <= 2:
        return token
    return stripped


def _allcap_differential(words: list[str]) -> bool:
    allcaps = sum(1 for w in words if w.isupper())
    return 0 < len(words) - allcaps < len(words)


def _negated(word: str) -> bool:
    return word in NEGATE or "n't" in word


def _scalar_inc_dec(word: str, valence: float, is_cap_diff: bool) -> float:
    scalar = 0.0
    word_lower = word.lower()
    if word_lower in BOOSTER_DICT:
        scalar = BOOSTER_DICT[word_lower]
        if valence < 0:
            scalar *= -1
        if word.isupper() and is_cap_diff:
            scalar += C_INCR if valence > 0 else -C_INCR
    return scalar


class LexiconSentimentScorer:
    """Compound-valence scorer over a configurable lexicon.

    Stateless after construction; safe for concurrent use.
    """

    concurrency_safe = True

    def __init__(self, lexicon_path: str | Path | None = None):
        self.lexicon = load_lexicon(lexicon_path)

    # -- public API ---------------------------------------------------------

    def compound(self, text: str) -> float:
        return self.polarity(text)["compound"]

    def polarity(self, text: str) -> dict[str, float]:
        """Full polarity breakdown: neg/neu/pos proportions plus compound."""
        words = [_strip_punc_if_word(tok) for tok in text.split()]
        is_cap_diff = _allcap_differential(words)
        sentiments: list[float] = []
        for i, item in enumerate(words):
            item_lower = item.lower()
            if item_lower in BOOSTER_DICT:
                sentiments.append(0.0)
                continue
            if i < len(words) - 1 and item_lower == "kind" and words[i + 1].lower() == "of":
                sentiments.append(0.0)
                continue
            sentiments.append(self._token_valence(words, is_cap_diff, item, i))
        sentiments = self._but_check(words, sentiments)
        return self._score_valence(sentiments, text)

    # -- rule machinery -----------------------------------------------------

    def _token_valence(self, words: list[str], is_cap_diff: bool, item: str, i: int) -> float:
        item_lower = item.lower()
        if item_lower not in self.lexicon:
            return 0.0
        valence = self.lexicon[item_lower]

        # "no" acts as a negator when it precedes (up to three tokens back,
        # via or/nor) or immediately follows with a lexicon word.
        if item_lower == "no" and i != len(words) - 1 and words[i + 1].lower() in self.lexicon:
            valence = 0.0
        if (
            (i > 0 and words[i - 1].lower() == "no")
            or (i > 1 and words[i - 2].lower() == "no")
            or (
                i > 2
                and words[i - 3].lower() == "no"
                and words[i - 1].lower() in ("or", "nor")
            )
        ):
            valence = self.lexicon[item_lower] * N_SCALAR

        if item.isupper() and is_cap_diff:
            valence += C_INCR if valence > 0 else -C_INCR

        for start_i in range(3):
            if i <= start_i or words[i - (start_i + 1)].lower() in self.lexicon:
                continue
            scalar = _scalar_inc_dec(words[i - (start_i + 1)], valence, is_cap_diff)
            if start_i == 1 and scalar != 0:
                scalar *= 0.95
            if start_i == 2 and scalar != 0:
                scalar *= 0.9
            valence += scalar
            valence = self._negation_check(valence, words, start_i, i)
            if start_i == 2:
                valence = self._special_idioms_check(valence, words, i)
        return self._least_check(valence, words, i)

    def _negation_check(self, valence: float, words: list[str], start_i: int, i: int) -> float:
        lower = [w.lower() for w in words]
        if start_i == 0:
            if _negated(lower[i - 1]):
                valence *= N_SCALAR
        if start_i == 1:
            if lower[i - 2] == "never" and lower[i - 1] in ("so", "this"):
                valence *= 1.25
            elif lower[i - 2] == "without" and lower[i - 1] == "doubt":
                pass
            elif _negated(lower[i - 2]):
                valence *= N_SCALAR
        if start_i == 2:
            if lower[i - 3] == "never" and (
                lower[i - 2] in ("so", "this") or lower[i - 1] in ("so", "this")
            ):
                valence *= 1.25
            elif lower[i - 3] == "without" and "doubt" in (lower[i - 2], lower[i - 1]):
                pass
            elif _negated(lower[i - 3]):
                valence *= N_SCALAR
        return valence

    def _special_idioms_check(self, valence: float, words: list[str], i: int) -> float:
        lower = [w.lower() for w in words]
        around = [
            f"{lower[i - 1]} {lower[i]}",
            f"{lower[i - 2]} {lower[i - 1]} {lower[i]}",
            f"{lower[i - 2]} {lower[i - 1]}",
            f"{lower[i - 3]} {lower[i - 2]} {lower[i - 1]}",
            f"{lower[i - 3]} {lower[i - 2]}",
        ]
        for seq in around:
            if seq in SPECIAL_CASES:
                valence = SPECIAL_CASES[seq]
                break
        if len(words) - 1 > i:
            ahead = f"{lower[i]} {lower[i + 1]}"
            if ahead in SPECIAL_CASES:
                valence = SPECIAL_CASES[ahead]
        if len(words) - 1 > i + 1:
            ahead = f"{lower[i]} {lower[i + 1]} {lower[i + 2]}"
            if ahead in SPECIAL_CASES:
                valence = SPECIAL_CASES[ahead]
        for n_gram in (around[3], around[4], around[2]):
            if n_gram in BOOSTER_DICT:
                valence += BOOSTER_DICT[n_gram]
        return valence

    def _least_check(self, valence: float, words: list[str], i: int) -> float:
        if i > 1 and words[i - 1].lower() not in self.lexicon and words[i - 1].lower() == "least":
            if words[i - 2].lower() not in ("at", "very"):
                valence *= N_SCALAR
        elif i > 0 and words[i - 1].lower() not in self.lexicon and words[i - 1].lower() == "least":
            valence *= N_SCALAR
        return valence

    @staticmethod
    def _but_check(words: list[str], sentiments: list[float]) -> list[float]:
        lower = [w.lower() for w in words]
        if "but" in lower:
            bi = lower.index("but")
            for si, sentiment in enumerate(sentiments):
                if si < bi:
                    sentiments[si] = sentiment * 0.5
                elif si > bi:
                    sentiments[si] = sentiment * 1.5
        return sentiments

    @staticmethod
    def _punctuation_emphasis(text: str) -> float:
        ep_count = min(text.count("!"), 4)
        ep_amplifier = ep_count * 0.292
        qm_count = text.count("?")
        qm_amplifier = 0.0
        if qm_count > 1:
            qm_amplifier = qm_count * 0.18 if qm_count <= 3 else 0.96
        return ep_amplifier + qm_amplifier

    def _score_valence(self, sentiments: list[float], text: str) -> dict[str, float]:
        if not sentiments:
            return {"neg": 0.0, "neu": 0.0, "pos": 0.0, "compound": 0.0}
        sum_s = float(sum(sentiments))
        punct = self._punctuation_emphasis(text)
        if sum_s > 0:
            sum_s += punct
        elif sum_s < 0:
            sum_s -= punct
        compound = normalize(sum_s)

        pos_sum = sum(s + 1 for s in sentiments if s > 0)
        neg_sum = sum(s - 1 for s in sentiments if s < 0)
        neu_count = sum(1 for s in sentiments if s == 0)
        if pos_sum > abs(neg_sum):
            pos_sum += punct
        elif pos_sum < abs(neg_sum):
            neg_sum -= punct
        total = pos_sum + abs(neg_sum) + neu_count
        return {
            "neg": round(abs(neg_sum / total), 3),
            "neu": round(abs(neu_count / total), 3),
            "pos": round(abs(pos_sum / total), 3),
            "compound": round(compound, 4),
        }
