# SPDX-License-Identifier: Apache-2.0
"""Regenerates the bundled proxy corpus. Output is deterministic."""

import os
import random

HERE = os.path.dirname(os.path.abspath(__file__))
WORDS = (
    "network channel node string program table output input string key bound "
    "complexity pair receiver sender message noise budget level condition "
    "stream event ledger witness frontier cut entropy source mutual"
).split()


SYLLABLES = [c + v for c in "bcdfghklmnprstvwz" for v in ("a", "e", "i", "o", "u", "ai", "ou")]


def lexicon(rng, size):
    words = set(WORDS)
    while len(words) < size:
        words.add("".join(rng.choice(SYLLABLES) for _ in range(rng.randint(1, 4))))
    return sorted(words)


def prose(rng, n, vocab=None):
    """Zipf-weighted words with sentence breaks and capitals."""
    vocab = vocab or LEXICON
    weights = [1.0 / (i + 1) for i in range(len(vocab))]
    out, size, start = [], 0, True
    while size < n:
        w = rng.choices(vocab, weights)[0]
        if start:
            w = w.capitalize()
            start = False
        if rng.random() < 0.07:
            w += rng.choice([".", ".", "?", ";"]) + ("\n" if rng.random() < 0.3 else "")
            start = True
        elif rng.random() < 0.05:
            w += ","
        out.append(w)
        size += len(w) + 1
    return " ".join(out).encode()[:n]


def dna(rng, n):
    return bytes(rng.choice(b"ACGT") for _ in range(n))


def noise(rng, n):
    return bytes(rng.getrandbits(8) for _ in range(n))


def table(rng, n):
    rows, i = [], 0
    while sum(len(r) for r in rows) < n:
        rows.append(f"{i},{rng.randint(0, 999)},{rng.choice(WORDS)},{rng.random():.4f}\n")
        i += 1
    return "".join(rows).encode()[:n]


def mutate(rng, data, rate, alphabet):
    """Point substitutions drawn from the file's own alphabet."""
    b = bytearray(data)
    for i in range(len(b)):
        if rng.random() < rate:
            b[i] = rng.choice(alphabet)
    return bytes(b)


def edit_words(rng, text, rate):
    words = text.split(b" ")
    return b" ".join(rng.choice(WORDS).encode() if rng.random() < rate else w for w in words)


def main():
    rng = random.Random(20260101)
    global LEXICON
    LEXICON = lexicon(rng, 2000)
    rng.shuffle(LEXICON)
    base_text = prose(rng, 8000)
    base_dna = dna(rng, 9000)
    files = [
        ("x", "x_prose.txt", base_text),
        ("y", "y_prose_edit.txt", edit_words(rng, base_text, 0.05)),
        ("z", "z_dna.txt", base_dna),
        ("w", "w_noise.bin", noise(rng, 6000)),
        ("p", "p_prose_tail.txt", base_text[4000:] + prose(rng, 2000)),
        ("q", "q_dna_edit.txt", mutate(rng, base_dna, 0.05, b"ACGT")),
    ]
    makers = [
        ("prose", prose, ".txt"),
        ("dna", dna, ".txt"),
        ("noise", noise, ".bin"),
        ("table", table, ".csv"),
    ]
    roles = "wxyzpq"
    for i in range(14):
        label, make, ext = makers[i % 4]
        size = 3000 + rng.randint(0, 9000)
        files.append((roles[i % 6], f"extra{i:02}_{label}{ext}", make(rng, size)))
    with open(os.path.join(HERE, "manifest.tsv"), "w") as m:
        m.write("# role\tpath\n")
        for role, name, data in files:
            with open(os.path.join(HERE, name), "wb") as f:
                f.write(data)
            m.write(f"{role}\t{name}\n")


if __name__ == "__main__":
    main()
