#!/usr/bin/env python3
"""Generate the synthetic vertical-format fixture corpus.

Writes fixtures/corpus.vrt and fixtures/corpus_plan.json. The plan records
what was planted into every (decade, genre) slice, so tests can compare
query output against construction counts instead of against the engine.

Design of the "in order that" profile:
  * overall rate strictly declines decade by decade;
  * genre-internal rates: non-fiction rises, magazine and newspaper fall,
    fiction wobbles without a trend;
  * the share of sentence-initial uses and of negated uses ("... not")
    stays roughly constant.

Usage: make_corpus.py [--out-dir fixtures]
"""

import argparse
import json
import random
from pathlib import Path

DECADES = list(range(1900, 2000, 10))
GENRES = ["fic", "mag", "news", "nf"]
TOKENS_PER_DECADE = 8000

# Genre shares move linearly from the 1890s-like mix to a 1990s-like mix.
SHARE_START = {"fic": 0.55, "mag": 0.23, "news": 0.07, "nf": 0.15}
SHARE_END = {"fic": 0.47, "mag": 0.26, "news": 0.14, "nf": 0.13}

IOT = {
    "news": [10, 9, 8, 7, 6, 5, 4, 3, 2, 1],
    "mag": [24, 21, 18, 16, 14, 12, 10, 8, 6, 4],
    "nf": [3, 4, 5, 6, 7, 8, 9, 10, 11, 12],
    "fic": [8, 7, 8, 7, 8, 6, 7, 7, 6, 7],
}
# Sentence-initial and negated uses per decade (over all genres).
IOT_INITIAL = [14, 11, 13, 10, 11, 9, 10, 7, 9, 6]
IOT_NEGATED = [10, 7, 8, 8, 6, 7, 5, 6, 4, 5]

# Competitor and distractor constructions per decade (spread over genres).
SO_THAT_GAP1 = [9, 10, 8, 9, 8, 7, 8, 6, 7, 6]
SO_THAT_GAP2 = [4, 5, 4, 4, 3, 4, 3, 3, 3, 2]
SO_THAT_GAP3 = [2, 2, 3, 2, 2, 2, 2, 1, 2, 1]
SO_THAT_RESULT = [5, 5, 5, 5, 5, 5, 5, 5, 5, 5]
IN_ORDER_FOR_TO = [1, 1, 2, 1, 2, 2, 3, 2, 3, 3]
FOR_TO = [6, 7, 8, 9, 10, 11, 12, 13, 14, 15]
SO_MODAL = [3, 4, 5, 6, 7, 8, 9, 10, 11, 12]

SUBJECTS = [["the", "at", "doctor", "nn1"], ["the", "at", "farmer", "nn1"],
            ["a", "at1", "woman", "nn1"], ["the", "at", "committee", "nn1"],
            ["my", "appge", "brother", "nn1"], ["the", "at", "children", "nn2"],
            ["our", "appge", "neighbour", "nn1"], ["the", "at", "editor", "nn1"],
            ["the", "at", "captain", "nn1"], ["his", "appge", "mother", "nn1"]]
VERBS = [("gave", "vvd"), ("built", "vvd"), ("wrote", "vvd"), ("carried", "vvd"),
         ("opened", "vvd"), ("visited", "vvd"), ("painted", "vvd"), ("sold", "vvd"),
         ("watched", "vvd"), ("found", "vvd"), ("mended", "vvd"), ("described", "vvd")]
OBJECTS = [["a", "at1", "letter", "nn1"], ["the", "at", "house", "nn1"],
           ["this", "dd1", "room", "nn1"], ["the", "at", "boat", "nn1"],
           ["a", "at1", "garden", "nn1"], ["the", "at", "papers", "nn2"],
           ["his", "appge", "horse", "nn1"], ["a", "at1", "road", "nn1"],
           ["the", "at", "fence", "nn1"], ["her", "appge", "coat", "nn1"]]
ADVERBS = [("quickly", "rr"), ("yesterday", "rt"), ("again", "rt"),
           ("early", "rr"), ("quietly", "rr"), ("carefully", "rr")]
PRONOUNS = [("he", "pphs1"), ("she", "pphs1"), ("we", "ppis2"), ("they", "pphs2"),
            ("I", "ppis1"), ("you", "ppy")]
MODALS = [("might", "vm"), ("could", "vm"), ("should", "vm"), ("would", "vm"),
          ("may", "vm"), ("shall", "vm")]
BASE_VERBS = [("eat", "vvi"), ("rest", "vvi"), ("leave", "vvi"), ("feel", "vvi"),
              ("see", "vvi"), ("work", "vvi"), ("read", "vvi"), ("learn", "vvi")]
PERIOD = (".", "y")
COMMA = (",", "y")


def pairs(flat):
    return [(flat[i], flat[i + 1]) for i in range(0, len(flat), 2)]


class Gen:
    def __init__(self, seed):
        self.rng = random.Random(seed)

    def pick(self, seq):
        return seq[self.rng.randrange(len(seq))]

    def clause(self):
        """Det N V Det N (5 tokens)."""
        return pairs(self.pick(SUBJECTS)) + [self.pick(VERBS)] + pairs(self.pick(OBJECTS))

    def capitalize(self, toks):
        first = toks[0]
        return [(first[0][:1].upper() + first[0][1:], first[1])] + toks[1:]

    def filler(self, k):
        """A filler sentence of exactly k >= 3 tokens."""
        assert k >= 3
        if k == 3:
            return [("He", "pphs1"), ("waited", "vvd"), PERIOD]
        if k < 6:
            toks = pairs(self.pick(SUBJECTS)) + [("waited", "vvd")]
            while len(toks) < k - 1:
                toks.append(self.pick(ADVERBS))
            return self.capitalize(toks + [PERIOD])
        toks = self.clause()
        while k - 1 - len(toks) >= 6:
            toks += [("and", "cc")] + self.clause()
        while len(toks) < k - 1:
            toks.append(self.pick(ADVERBS))
        return self.capitalize(toks + [PERIOD])

    def purpose_tail(self, negated):
        toks = [self.pick(PRONOUNS), self.pick(MODALS)]
        if negated:
            toks.append(("not", "xx"))
        toks.append(self.pick(BASE_VERBS))
        return toks

    def iot_final(self, negated):
        return self.capitalize(self.clause() + [("in", "ii"), ("order", "nn1"), ("that", "cst")]
                               + self.purpose_tail(negated) + [PERIOD])

    def iot_initial(self, negated, quoted):
        head = [("In", "ii"), ("order", "nn1"), ("that", "cst")] + self.purpose_tail(negated)
        toks = head + [COMMA] + self.clause() + [PERIOD]
        if quoted:
            toks = [('"', "y")] + toks[:-1] + [PERIOD, ('"', "y")]
        return toks

    def so_that_modal(self, gap):
        if gap == 1:
            mid = [self.pick(PRONOUNS)]
        elif gap == 2:
            mid = pairs(self.pick(SUBJECTS))
        else:
            mid = pairs(self.pick(SUBJECTS))
            mid = [mid[0], ("old", "jj"), mid[1]]
        return self.capitalize(self.clause() + [("so", "cs"), ("that", "cst")] + mid
                               + [self.pick(MODALS), self.pick(BASE_VERBS), PERIOD])

    def so_that_result(self):
        return self.capitalize(self.clause() + [COMMA, ("so", "cs"), ("that", "cst")]
                               + [self.pick(PRONOUNS), ("left", "vvd"), ("early", "rr"), PERIOD])

    def in_order_for_to(self):
        return self.capitalize(self.clause() + [("in", "ii"), ("order", "nn1"), ("for", "if"),
                                                self.pick(PRONOUNS), ("to", "to"),
                                                self.pick(BASE_VERBS), PERIOD])

    def for_to(self):
        return self.capitalize(self.clause() + [("for", "if"), self.pick(PRONOUNS), ("to", "to"),
                                                self.pick(BASE_VERBS), PERIOD])

    def so_modal(self):
        return self.capitalize(self.clause() + [("so", "cs"), self.pick(PRONOUNS),
                                                self.pick(MODALS), self.pick(BASE_VERBS), PERIOD])


def genre_tokens(di):
    t = di / (len(DECADES) - 1)
    shares = {g: SHARE_START[g] + (SHARE_END[g] - SHARE_START[g]) * t for g in GENRES}
    totals = {g: round(shares[g] * TOKENS_PER_DECADE) for g in GENRES}
    totals["fic"] += TOKENS_PER_DECADE - sum(totals.values())
    return totals


def spread(n, weights):
    """Deal n items round-robin over genres, largest slice first."""
    out = {g: 0 for g in GENRES}
    order = sorted(GENRES, key=lambda g: -weights[g])
    for i in range(n):
        out[order[i % len(order)]] += 1
    return out


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--out-dir", default=str(Path(__file__).resolve().parents[2] / "fixtures"))
    args = ap.parse_args()
    out_dir = Path(args.out_dir)

    gen = Gen(20210419)
    lines = ["## synthetic fixture corpus; regenerate with tools/fixtures/make_corpus.py"]
    plan = {"decades": DECADES, "genres": GENRES, "slices": []}

    for di, decade in enumerate(DECADES):
        totals = genre_tokens(di)
        iot_counts = {g: IOT[g][di] for g in GENRES}
        n_iot = sum(iot_counts.values())
        # Initial / negated flags assigned round-robin over the decade's uses.
        flags = []
        for i in range(n_iot):
            flags.append({"initial": False, "negated": False})
        step_i = n_iot / IOT_INITIAL[di]
        for j in range(IOT_INITIAL[di]):
            flags[int(j * step_i)]["initial"] = True
        step_n = n_iot / IOT_NEGATED[di]
        for j in range(IOT_NEGATED[di]):
            flags[(int(j * step_n) + 1) % n_iot]["negated"] = True

        others = {
            "so_that_gap1": spread(SO_THAT_GAP1[di], totals),
            "so_that_gap2": spread(SO_THAT_GAP2[di], totals),
            "so_that_gap3": spread(SO_THAT_GAP3[di], totals),
            "so_that_result": spread(SO_THAT_RESULT[di], totals),
            "in_order_for_to": spread(IN_ORDER_FOR_TO[di], totals),
            "for_to": spread(FOR_TO[di], totals),
            "so_modal": spread(SO_MODAL[di], totals),
        }

        flag_pos = 0
        for g in GENRES:
            special = []
            initial = negated = quoted = 0
            for _ in range(iot_counts[g]):
                f = flags[flag_pos]
                flag_pos += 1
                if f["initial"]:
                    q = (initial % 4 == 3)
                    special.append(gen.iot_initial(f["negated"], q))
                    initial += 1
                    quoted += q
                else:
                    special.append(gen.iot_final(f["negated"]))
                negated += f["negated"]
            for gap, key in ((1, "so_that_gap1"), (2, "so_that_gap2"), (3, "so_that_gap3")):
                special += [gen.so_that_modal(gap) for _ in range(others[key][g])]
            special += [gen.so_that_result() for _ in range(others["so_that_result"][g])]
            special += [gen.in_order_for_to() for _ in range(others["in_order_for_to"][g])]
            special += [gen.for_to() for _ in range(others["for_to"][g])]
            special += [gen.so_modal() for _ in range(others["so_modal"][g])]
            gen.rng.shuffle(special)

            budget = totals[g]
            budget -= sum(len(s) for s in special)
            assert budget > 200, (decade, g, budget)
            # Two documents per slice, years inside the decade.
            docs = [[], []]
            for i, s in enumerate(special):
                docs[i % 2].append(s)
            remaining = [budget // 2, budget - budget // 2]
            for d in range(2):
                fill = []
                while remaining[d] > 0:
                    k = gen.rng.randint(6, 16)
                    if remaining[d] - k < 3:
                        k = remaining[d]
                    fill.append(gen.filler(k))
                    remaining[d] -= k
                merged = []
                slots = len(fill) + len(docs[d])
                # Interleave special sentences deterministically among fillers.
                spec_iter = iter(docs[d])
                fill_iter = iter(fill)
                specials_left = len(docs[d])
                for i in range(slots):
                    if specials_left and (i % 3 == 1 or slots - i == specials_left):
                        merged.append(next(spec_iter))
                        specials_left -= 1
                    else:
                        merged.append(next(fill_iter))
                year = decade + (2 if d == 0 else 7)
                lines.append(f"#doc id={g}_{decade}_{d + 1} year={year} genre={g}")
                for s in merged:
                    for surface, pos in s:
                        lines.append(f"{surface}\t{pos}")
                    lines.append("")
            plan["slices"].append({
                "decade": decade, "genre": g, "tokens": totals[g],
                "in_order_that": iot_counts[g], "in_order_that_initial": initial,
                "in_order_that_quoted_initial": quoted, "in_order_that_negated": negated,
                **{k: v[g] for k, v in others.items()},
            })

    out_dir.mkdir(parents=True, exist_ok=True)
    (out_dir / "corpus.vrt").write_text("\n".join(lines) + "\n", encoding="utf-8")
    (out_dir / "corpus_plan.json").write_text(json.dumps(plan, indent=2) + "\n", encoding="utf-8")

    # Sanity checks on the planted profile.
    per_decade = [sum(s["in_order_that"] for s in plan["slices"] if s["decade"] == d) for d in DECADES]
    assert all(a > b for a, b in zip(per_decade, per_decade[1:])), per_decade
    for g in ("news", "mag"):
        rates = [s["in_order_that"] / s["tokens"] for s in plan["slices"] if s["genre"] == g]
        assert all(a > b for a, b in zip(rates, rates[1:])), (g, rates)
    rates = [s["in_order_that"] / s["tokens"] for s in plan["slices"] if s["genre"] == "nf"]
    assert all(a < b for a, b in zip(rates, rates[1:])), rates
    print("tokens:", sum(s["tokens"] for s in plan["slices"]), "per-decade in order that:", per_decade)


if __name__ == "__main__":
    main()
