"""Regenerates the toy corpus in this directory.

Writes lexicon.txt, analyzer.toml, train.raw (tokens), train.md (gold
morpheme paths in lattice format) and train.conll (gold trees). The lexicon
holds the reference analyses of hbn, /snm and b.sl verbatim; every other
token is either a lexicon homograph or composed from a prefix table.

    python3 generate.py
"""

import random
from pathlib import Path

HERE = Path(__file__).resolve().parent

FEATURE_KEYS = ["gen", "num", "per", "tense"]

# Reference analyses, in the order that reproduces the lattice table.
REFERENCE_LEXICON = [
    "hbn h~DEF:bn~NNP-M-S: bn h~DEF:bn~NNT-M-S: bn h~DEF:bn~NN-M-S: bn"
    " h~DEF:b~IN:hn~S_PRN-F-P-3 b"
    " h~REL:bn~NNP-M-S: bn h~REL:bn~NNT-M-S: bn h~REL:bn~NN-M-S: bn"
    " h~REL:b~IN:hn~S_PRN-F-P-3 b"
    " :VB-M-S-2-IMPERATIVE: hbyn",
    "/snm /s~REL:nm~VB-M-S-A-BEINONI: nm /s~REL:nm~BNT-M-S-A: nm"
    " /s~REL:nm~BN-M-S-A: nm /s~REL:nm~VB-M-S-3-PAST: nm"
    " :NN-F-S:S_PRN-M-P-3 /sn",
    "b.sl b~PREPOSITION+h~DEF:.sl~NNT-M-S: .sl b~PREPOSITION+h~DEF:.sl~NN-M-S: .sl"
    " b~PREPOSITION:.sl~NN-M-S: .sl b~PREPOSITION:.sl~NNT-M-S: .sl"
    " :NN-M-S: b.sl :NNT-M-S: b.sl",
]

NOUNS = ["ild", "spr", "byt", "gn", "ym", "mlk", "kl", "ktb", "/wq", "dg"]
VERBS = ["/kb", "ra", "hlk", "akl", "ysb", "spr", "ktb", "/mr"]
TRANSITIVE = ["ra", "akl", "spr", "ktb", "/mr"]
ADJECTIVES = ["gdwl", "qtn", "twb", "ypt"]
# Extra analyses that make the homographs ambiguous.
NOUN_ALSO_VERB = {"spr", "ktb"}
VERB_ALSO_NOUN = {"akl", "/mr"}
ADJ_ALSO_VERB = {"gdwl"}

ANALYZER_TOML = """\
# Prefix composition for tokens that miss the lexicon.
compose_prefixes = true
max_prefix_depth = 3

[[prefixes]]
surface = "b"
analyses = ["b~PREPOSITION", "b~PREPOSITION+h~DEF"]

[[prefixes]]
surface = "l"
analyses = ["l~PREPOSITION", "l~PREPOSITION+h~DEF"]

[[prefixes]]
surface = "h"
analyses = ["h~DEF"]

[[prefixes]]
surface = "/s"
analyses = ["/s~REL"]
"""


def feats(spec):
    if not spec:
        return "_"
    return "|".join(f"{k}={v}" for k, v in zip(FEATURE_KEYS, spec.split("-")))


def seg(form, pos, spec="", lemma=None):
    return {"form": form, "pos": pos, "feats": feats(spec), "lemma": lemma or form}


class Sentence:
    def __init__(self):
        self.tokens = []
        self.segs = []  # (token index, segment)
        self.heads = {}  # segment index (1-based) -> (head, label)

    def word(self, surface, segments):
        self.tokens.append(surface)
        start = len(self.segs) + 1
        for s in segments:
            self.segs.append((len(self.tokens), s))
        return list(range(start, start + len(segments)))

    def arc(self, dep, head, label):
        self.heads[dep] = (head, label)

    # Word builders return the segment that attaches outward.
    def def_noun(self, n):
        h, host = self.word("h" + n, [seg("h", "DEF"), seg(n, "NN", "M-S")])
        self.arc(h, host, "def")
        return host

    def prep_phrase(self, p, n):
        if p + n == "b.sl":
            ids = self.word("b.sl", [seg("b", "PREPOSITION"), seg("h", "DEF"), seg(".sl", "NN", "M-S")])
        else:
            ids = self.word(p + n, [seg(p, "PREPOSITION"), seg("h", "DEF"), seg(n, "NN", "M-S")])
        prep, h, host = ids
        self.arc(h, host, "def")
        self.arc(host, prep, "pobj")
        return prep

    def verb(self, v):
        (v_id,) = self.word(v, [seg(v, "VB", "M-S-3-PAST")])
        return v_id

    def def_adj(self, a):
        h, host = self.word("h" + a, [seg("h", "DEF"), seg(a, "JJ", "M-S")])
        self.arc(h, host, "def")
        return host

    def rel_verb(self, v):
        rel, host = self.word("/s" + v, [seg("/s", "REL"), seg(v, "VB", "M-S-3-PAST")])
        self.arc(host, rel, "relcomp")
        return rel, host

    def obj_marker(self):
        (at,) = self.word("at", [seg("at", "AT")])
        return at


def sample_verbal():
    s = Sentence()
    h, bn = s.word("hbn", [seg("h", "DEF"), seg("bn", "NN", "M-S")])
    s.arc(h, bn, "def")
    (v,) = s.word("/skb", [seg("/skb", "VB", "M-S-3-PAST", "/kb")])
    pp = s.prep_phrase("b", ".sl")
    s.arc(bn, v, "subj")
    s.arc(v, 0, "ROOT")
    s.arc(pp, v, "prepmod")
    return s


def sample_nominal():
    s = Sentence()
    h, bn = s.word("hbn", [seg("h", "DEF"), seg("bn", "NN", "M-S")])
    s.arc(h, bn, "def")
    rel, nm = s.word("/snm", [seg("/s", "REL"), seg("nm", "BN", "M-S-A")])
    s.arc(nm, rel, "relcomp")
    pp = s.prep_phrase("b", ".sl")
    s.arc(bn, 0, "ROOT")
    s.arc(rel, bn, "rcmod")
    s.arc(pp, nm, "prepmod")
    return s


def random_sentence(rng, kind):
    s = Sentence()
    subj = s.def_noun(rng.choice(NOUNS))
    if kind == "intransitive":
        v = s.verb(rng.choice(VERBS))
        s.arc(subj, v, "subj")
        s.arc(v, 0, "ROOT")
        s.arc(s.prep_phrase(rng.choice("bl"), rng.choice(NOUNS)), v, "prepmod")
    elif kind == "marked_object":
        v = s.verb(rng.choice(TRANSITIVE))
        at = s.obj_marker()
        s.arc(subj, v, "subj")
        s.arc(v, 0, "ROOT")
        s.arc(at, v, "obj")
        s.arc(s.def_noun(rng.choice(NOUNS)), at, "pobj")
    elif kind == "relative":
        rel, v = s.rel_verb(rng.choice(VERBS))
        s.arc(subj, 0, "ROOT")
        s.arc(rel, subj, "rcmod")
        s.arc(s.prep_phrase(rng.choice("bl"), rng.choice(NOUNS)), v, "prepmod")
    elif kind == "adjective":
        adj = s.def_adj(rng.choice(ADJECTIVES))
        v = s.verb(rng.choice(VERBS))
        s.arc(adj, subj, "amod")
        s.arc(subj, v, "subj")
        s.arc(v, 0, "ROOT")
        s.arc(s.prep_phrase(rng.choice("bl"), rng.choice(NOUNS)), v, "prepmod")
    return s


def lexicon_lines():
    lines = list(REFERENCE_LEXICON)
    lines.append("/skb :VB-M-S-3-PAST: /kb /s~REL:kb~NN-M-S: kb")
    lines.append("at :AT: at :PRP-F-S-2: at")
    words = {}
    for n in NOUNS:
        words.setdefault(n, []).append(("NN-M-S", n))
        if n in NOUN_ALSO_VERB:
            words[n].append(("VB-M-S-3-PAST", n))
    for v in VERBS:
        entry = ("VB-M-S-3-PAST", v)
        if entry not in words.setdefault(v, []):
            words[v].append(entry)
        if v in VERB_ALSO_NOUN:
            words[v].append(("NN-M-S", v))
    for a in ADJECTIVES:
        words.setdefault(a, []).append(("JJ-M-S", a))
        if a in ADJ_ALSO_VERB:
            words[a].append(("VB-M-S-3-PAST", a))
    words.setdefault(".sl", []).append(("NN-M-S", ".sl"))
    for w, analyses in words.items():
        lines.append(w + "".join(f" :{spec}: {lemma}" for spec, lemma in analyses))
    return lines


def write_corpus(sentences):
    raw, md, conll = [], [], []
    for s in sentences:
        raw.extend(s.tokens)
        raw.append("")
        for i, (tok, g) in enumerate(s.segs):
            md.append(f"{i}\t{i + 1}\t{g['form']}\t{g['lemma']}\t{g['pos']}\t{g['pos']}\t{g['feats']}\t{tok}")
            head, label = s.heads[i + 1]
            conll.append(
                f"{i + 1}\t{g['form']}\t{g['lemma']}\t{g['pos']}\t{g['pos']}\t{g['feats']}\t{head}\t{label}\t_\t_"
            )
        md.append("")
        conll.append("")
    (HERE / "train.raw").write_text("\n".join(raw) + "\n")
    (HERE / "train.md").write_text("\n".join(md) + "\n")
    (HERE / "train.conll").write_text("\n".join(conll) + "\n")


def main():
    rng = random.Random(7)
    kinds = ["intransitive", "marked_object", "relative", "adjective"]
    sentences = [sample_verbal(), sample_nominal()]
    for i in range(38):
        sentences.append(random_sentence(rng, kinds[i % len(kinds)]))
    for s in sentences:
        assert len(s.heads) == len(s.segs), s.tokens
    (HERE / "lexicon.txt").write_text("\n".join(lexicon_lines()) + "\n")
    (HERE / "analyzer.toml").write_text(ANALYZER_TOML)
    write_corpus(sentences)


if __name__ == "__main__":
    main()
