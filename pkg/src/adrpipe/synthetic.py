"""Deterministic synthetic tweet corpora for desk-scale protocol runs.

Positives describe a drug side effect, often hedged or without naming the
drug; negatives are mundane chatter, neutral drug mentions, and near-misses
that reuse drug and symptom words in non-ADR contexts. A slice of tweets
gets a one-character typo, and a count-preserving slice of labels is flipped
as annotation noise. The mix keeps the task learnable but imperfect, so
separately seeded training runs and different feature views disagree enough
for ensembling to have something to do.
"""

from __future__ import annotations

import random

from .corpus import Dataset, LabeledTweet, seeded_shuffle

DRUGS = [
    "quetiapine", "olanzapine", "fluoxetine", "sertraline", "duloxetine",
    "venlafaxine", "bupropion", "lamotrigine", "gabapentin", "zolpidem",
    "seroquel", "zyprexa", "prozac", "zoloft", "cymbalta",
    "effexor", "wellbutrin", "lamictal", "neurontin", "ambien",
]

SYMPTOMS = [
    "dizzy", "nauseous", "shaky", "foggy", "exhausted", "wired",
    "numb", "jittery", "drowsy", "restless",
]

ADR_TEMPLATES = [
    "{drug} has me feeling so {symptom} today",
    "day three on {drug} and i am {symptom} nonstop",
    "woke up {symptom} again, pretty sure it's the {drug}",
    "this {drug} headache will not quit",
    "{drug} is making me {symptom} and i hate it",
    "cannot sleep at all since starting {drug}",
    "my hands will not stop shaking on {drug}",
    "{drug} dry mouth is driving me up the wall",
    "the {drug} zombie feeling is real, total fog all morning",
    "might quit {drug}, the {symptom} spells are too much",
    "not sure if it is the {drug} or just me but i have been {symptom} all week",
    "anyone else {symptom} on {drug} or is that just my luck",
    "since the {drug} bump i am {symptom} by lunchtime every day",
    "low key think {drug} is behind the {symptom} evenings lately",
]

# A slice of positives never name the drug; models have to work for these.
VAGUE_ADR_TEMPLATES = [
    "whatever is in these new pills, my head is pounding",
    "new meds have me {symptom} since tuesday, not a fan",
    "these tablets make me so {symptom} i can barely type",
    "started the new prescription and now i am {symptom} around the clock",
    "the dose change has me {symptom}, calling the clinic tomorrow",
]

NEUTRAL_TEMPLATES = [
    "lovely day for a walk in the park",
    "coffee first, everything else later",
    "traffic on the ring road again, classic monday",
    "new episode tonight, could not be more ready",
    "finally finished that book everyone keeps recommending",
    "rain all weekend apparently, great",
    "someone bring snacks to the study session please",
    "the bakery on fifth has the best rolls, not up for debate",
    "lost my umbrella on the bus, obviously",
    "weekend plans: absolutely nothing and proud of it",
]

NEUTRAL_DRUG_TEMPLATES = [
    "picked up my {drug} refill today, quick trip",
    "pharmacy finally has {drug} back in stock",
    "started {drug} today, fingers crossed",
    "{drug} price went up again, wonderful",
    "doctor switched me to {drug}, we will see how it goes",
    "remembered my {drug} on time for once, growth",
    "the {drug} shortage article was interesting reading",
]

# Drug and symptom vocabulary in non-ADR contexts; false-positive bait.
NEAR_MISS_TEMPLATES = [
    "this spreadsheet is giving me a headache",
    "so exhausted after the gym, worth it though",
    "deadlines have me dizzy, send help",
    "that plot twist left me shaky, what a film",
    "foggy morning on the coast, gorgeous",
    "my cousin said {drug} made her {symptom} but mine has been fine",
    "reading about {drug} side effects for class, wild stuff",
    "they asked if {drug} makes me {symptom} and honestly no, all good",
    "jittery from the double espresso, not the meds",
]

HASHTAGS = ["#monday", "#meds", "#health", "#tired", "#CoffeeTime", "#NoSleep"]
HANDLES = ["@sam_k", "@nurse_jo", "@BestieLaura", "@tom88", "@pharmafriend"]


def _typo(word: str, rng: random.Random) -> str:
    if len(word) < 4:
        return word
    i = rng.randrange(1, len(word) - 1)
    if rng.random() < 0.5:
        return word[:i] + word[i + 1 :]  # drop a letter
    return word[:i] + word[i] + word[i:]  # double a letter


def _decorate(text: str, rng: random.Random) -> str:
    roll = rng.random()
    if roll < 0.12:
        text = f"{rng.choice(HANDLES)} {text}"
    elif roll < 0.22:
        text = f"{text} {rng.choice(HASHTAGS)}"
    elif roll < 0.27:
        text = f"{text} https://t.co/{rng.randrange(16**6):06x}"
    elif roll < 0.30:
        text = f"{text} via newsletter@example.com"
    if rng.random() < 0.25:
        words = text.split()
        j = rng.randrange(len(words))
        if not words[j].startswith(("@", "#", "https://")):
            words[j] = _typo(words[j], rng)
            text = " ".join(words)
    if rng.random() < 0.10:
        text = text.capitalize()
    return text


def make_synthetic_dataset(
    n: int, positive_fraction: float, seed: int, label_noise: float = 0.05
) -> Dataset:
    """Generate n labeled tweets with the given positive share, deterministically.

    label_noise flips that fraction of positives to negative and the same
    number of negatives to positive, so the class balance stays exact while
    the labels carry annotation-style noise.
    """
    if not 0.0 <= positive_fraction <= 1.0:
        raise ValueError("positive_fraction must be in [0, 1]")
    if not 0.0 <= label_noise < 0.5:
        raise ValueError("label_noise must be in [0, 0.5)")
    rng = random.Random(seed)
    n_pos = round(n * positive_fraction)
    texts_labels = []
    for i in range(n):
        label = 1 if i < n_pos else 0
        if label == 1:
            if rng.random() < 0.20:
                text = rng.choice(VAGUE_ADR_TEMPLATES)
            else:
                text = rng.choice(ADR_TEMPLATES)
        else:
            roll = rng.random()
            if roll < 0.50:
                text = rng.choice(NEUTRAL_TEMPLATES)
            elif roll < 0.80:
                text = rng.choice(NEUTRAL_DRUG_TEMPLATES)
            else:
                text = rng.choice(NEAR_MISS_TEMPLATES)
        text = text.format(drug=rng.choice(DRUGS), symptom=rng.choice(SYMPTOMS))
        texts_labels.append([_decorate(text, rng), label])

    flips = round(label_noise * n_pos)
    pos_idx = [i for i, (_, label) in enumerate(texts_labels) if label == 1]
    neg_idx = [i for i, (_, label) in enumerate(texts_labels) if label == 0]
    seeded_shuffle(pos_idx, rng)
    seeded_shuffle(neg_idx, rng)
    for i in pos_idx[:flips]:
        texts_labels[i][1] = 0
    for i in neg_idx[:flips]:
        texts_labels[i][1] = 1

    records = [
        LabeledTweet(f"s{i + 1:05d}", text, label)
        for i, (text, label) in enumerate(texts_labels)
    ]
    seeded_shuffle(records, rng)
    return Dataset.from_records(records)
