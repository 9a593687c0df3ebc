#!/usr/bin/env python3
# Copyright 2026 The Anuvaad Authors
#
# Licensed under the Apache License, Version 2.0 (the "License");
# you may not use this file except in compliance with the License.
# You may obtain a copy of the License at
#
#      http://www.apache.org/licenses/LICENSE-2.0
#
# Unless required by applicable law or agreed to in writing, software
# distributed under the License is distributed on an "AS IS" BASIS,
# WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
# See the License for the specific language governing permissions and
# limitations under the License.
"""Generates metric fixture corpora and freezes reference scores.

Scores come from the sacrebleu package; bootstrap and paired-test values are
replayed here with an independent implementation of the resampling streams.

    python3 scripts/gen_metric_fixtures.py tests/fixtures/metrics
"""

import json
import random
import sys
from pathlib import Path

import numpy as np
import sacrebleu

MASK = (1 << 64) - 1
GOLDEN = 0x9E3779B97F4A7C15

VOCAB = {
    "en": ("the government announced a new scheme today for farmers and students in rural areas "
           "water electricity school children education minister said it was ready by march "
           "report price rose percent while rain delayed work on roads bridges").split(),
    "hi": ("भारत सरकार ने आज नई योजना की घोषणा किसानों के लिए पानी बिजली स्कूल बच्चों शिक्षा "
           "मंत्री कहा है था में से और यह प्रतिशत बारिश सड़क काम देर").split(),
    "te": ("ప్రభుత్వం ఈ రోజు కొత్త పథకం ప్రకటించింది రైతులకు నీరు విద్యుత్ పాఠశాల పిల్లలు "
           "విద్య మంత్రి చెప్పారు మరియు వర్షం రహదారి పని ఆలస్యం").split(),
    "bn": ("সরকার আজ নতুন প্রকল্প ঘোষণা করেছে কৃষকদের জন্য জল বিদ্যুৎ স্কুল শিশুদের শিক্ষা "
           "মন্ত্রী বলেছেন এবং বৃষ্টি রাস্তা কাজ দেরি").split(),
}
NUMBERS = {"en": ["2023", "15", "3.5", "1,000", "40%"], "hi": ["२०२३", "१५", "3.5", "40%"],
           "te": ["2023", "౧౫", "3.5"], "bn": ["২০২৩", "১৫", "3.5"]}
END = {"en": [".", "?", "!"], "hi": ["।", "?", "।"], "te": [".", "?", "।"], "bn": ["।", "?", "!"]}
INNER = [",", ":", "(", ")", "\"", "-", "$", "+"]


def sentence(rng, lang):
    words = [rng.choice(VOCAB[lang]) for _ in range(rng.randint(3, 16))]
    if rng.random() < 0.4:
        words.insert(rng.randrange(len(words)), rng.choice(NUMBERS[lang]))
    if rng.random() < 0.4:
        pos = rng.randrange(1, len(words))
        words[pos] = words[pos] + rng.choice(INNER)
    if lang == "en" and rng.random() < 0.5:
        words[0] = words[0].capitalize()
    return " ".join(words) + rng.choice(END[lang])


def perturb(rng, lang, ref, strength):
    if rng.random() < 0.15 * (1 - strength):
        return ref
    words = ref.split()
    for _ in range(max(1, int(len(words) * strength))):
        op = rng.random()
        if not words:
            break
        i = rng.randrange(len(words))
        if op < 0.3:
            del words[i]
        elif op < 0.6:
            words[i] = rng.choice(VOCAB[lang])
        elif op < 0.75:
            words.insert(i, rng.choice(VOCAB[lang]))
        elif op < 0.9 and i + 1 < len(words):
            words[i], words[i + 1] = words[i + 1], words[i]
        else:
            words[i] = words[i].upper() if lang == "en" else words[i] + ","
    return " ".join(words)


def make_fixture(seed, langs, n, strength, empty_hyp=False):
    rng = random.Random(seed)
    refs, hyps, hyps_b = [], [], []
    for k in range(n):
        lang = langs[k % len(langs)]
        ref = sentence(rng, lang)
        refs.append(ref)
        hyps.append(perturb(rng, lang, ref, strength))
        hyps_b.append(perturb(rng, lang, ref, min(0.9, strength * 2)))
    if empty_hyp:
        hyps[n // 2] = ""
    return refs, hyps, hyps_b


# Independent replay of the resampling streams used by the C++ bootstrap.
def mix(z):
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & MASK
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & MASK
    return z ^ (z >> 31)


class Stream:
    def __init__(self, seed, index):
        self.state = mix(seed ^ mix((index + GOLDEN) & MASK))

    def next(self):
        self.state = (self.state + GOLDEN) & MASK
        return mix(self.state)

    def below(self, bound):
        m = self.next() * bound
        low = m & MASK
        if low < bound:
            threshold = ((1 << 64) - bound) % bound
            while low < threshold:
                m = self.next() * bound
                low = m & MASK
        return m >> 64


def resample(seed, r, n):
    s = Stream(seed, r)
    return [s.below(n) for _ in range(n)]


def bleu_metric():
    return sacrebleu.metrics.BLEU(tokenize="intl")


def chrf_metric():
    return sacrebleu.metrics.CHRF()


def corpus(metric, refs, hyps):
    return metric.corpus_score(hyps, [refs]).score


def wer_oracle(refs, hyps):
    edits = words = 0
    for r, h in zip(refs, hyps):
        r, h = r.split(), h.split()
        d = [[i + j if i * j == 0 else 0 for j in range(len(h) + 1)] for i in range(len(r) + 1)]
        for i in range(1, len(r) + 1):
            for j in range(1, len(h) + 1):
                d[i][j] = min(d[i - 1][j] + 1, d[i][j - 1] + 1, d[i - 1][j - 1] + (r[i - 1] != h[j - 1]))
        edits += d[len(r)][len(h)]
        words += len(r)
    return edits / words


def paired_p(make_metric, refs, a, b, n_resamples, seed, lower_is_better=False):
    not_better = 0
    for r in range(n_resamples):
        idx = resample(seed, r, len(refs))
        rr = [refs[i] for i in idx]
        sa = make_metric(rr, [a[i] for i in idx])
        sb = make_metric(rr, [b[i] for i in idx])
        if (sa >= sb) if lower_is_better else (sa <= sb):
            not_better += 1
    return (1 + not_better) / (1 + n_resamples)


def ci(make_metric, refs, hyps, n_resamples, seed):
    scores = []
    for r in range(n_resamples):
        idx = resample(seed, r, len(refs))
        scores.append(make_metric([refs[i] for i in idx], [hyps[i] for i in idx]))
    lo, hi = np.percentile(np.array(scores), [2.5, 97.5], method="linear")
    return [float(lo), float(hi)]


def write_lines(path, lines):
    path.write_text("".join(line + "\n" for line in lines), encoding="utf-8")


def main(out_dir):
    out = Path(out_dir)
    specs = {
        "en_news": dict(seed=1, langs=["en"], n=40, strength=0.25),
        "hi_devanagari": dict(seed=2, langs=["hi"], n=30, strength=0.3, empty_hyp=True),
        "te_bn_mixed": dict(seed=3, langs=["te", "bn"], n=60, strength=0.35),
        "mixed_script": dict(seed=4, langs=["en", "hi", "te", "bn"], n=100, strength=0.2),
        "paired10": dict(seed=5, langs=["hi", "en"], n=10, strength=0.2),
    }
    expected = {"sacrebleu_version": sacrebleu.__version__, "fixtures": {}}
    bleu, chrf = bleu_metric(), chrf_metric()
    bleu_plain = sacrebleu.metrics.BLEU(tokenize="none", smooth_method="none")
    chrf_pp = sacrebleu.metrics.CHRF(word_order=2)
    for name, spec in specs.items():
        refs, hyps, hyps_b = make_fixture(**spec)
        d = out / name
        d.mkdir(parents=True, exist_ok=True)
        write_lines(d / "ref.txt", refs)
        write_lines(d / "hyp.txt", hyps)
        write_lines(d / "hyp_b.txt", hyps_b)
        expected["fixtures"][name] = {
            "sentences": len(refs),
            "bleu": corpus(bleu, refs, hyps),
            "bleu_b": corpus(bleu, refs, hyps_b),
            "bleu_whitespace_nosmooth": corpus(bleu_plain, refs, hyps),
            "chrf": corpus(chrf, refs, hyps),
            "chrf_b": corpus(chrf, refs, hyps_b),
            "chrf_word_order2": corpus(chrf_pp, refs, hyps),
            "wer": wer_oracle(refs, hyps),
        }

    refs = (out / "paired10" / "ref.txt").read_text(encoding="utf-8").splitlines()
    a = (out / "paired10" / "hyp.txt").read_text(encoding="utf-8").splitlines()
    b = (out / "paired10" / "hyp_b.txt").read_text(encoding="utf-8").splitlines()
    seed, n_resamples = 20240607, 200
    expected["paired"] = {
        "fixture": "paired10",
        "seed": seed,
        "n_resamples": n_resamples,
        "first_resamples": [resample(seed, r, len(refs)) for r in range(3)],
        "bleu_p": paired_p(lambda r, h: corpus(bleu, r, h), refs, a, b, n_resamples, seed),
        "chrf_p": paired_p(lambda r, h: corpus(chrf, r, h), refs, a, b, n_resamples, seed),
        "wer_p": paired_p(wer_oracle, refs, a, b, n_resamples, seed, lower_is_better=True),
    }

    refs = (out / "en_news" / "ref.txt").read_text(encoding="utf-8").splitlines()
    hyps = (out / "en_news" / "hyp.txt").read_text(encoding="utf-8").splitlines()
    expected["bootstrap"] = {
        "fixture": "en_news",
        "seed": 7,
        "n_resamples": 100,
        "bleu_ci": ci(lambda r, h: corpus(bleu, r, h), refs, hyps, 100, 7),
        "chrf_ci": ci(lambda r, h: corpus(chrf, r, h), refs, hyps, 100, 7),
    }
    (out / "expected.json").write_text(json.dumps(expected, indent=2, ensure_ascii=False) + "\n", encoding="utf-8")


if __name__ == "__main__":
    main(sys.argv[1] if len(sys.argv) > 1 else "tests/fixtures/metrics")
