#!/usr/bin/env python3
"""Walk through the tweet-cleaning pipeline one stage at a time.

Each stage is shown on its own, then the full pipeline runs over a handful of
messy tweets. The lexicon maps drug brand names to generic names; the
lowercase stage must run first so brand mentions match regardless of casing.
"""

from pathlib import Path

from adrpipe import (
    PipelineConfig,
    anonymize,
    load_lexicon,
    preprocess,
    remove_hashtags,
    replace_handles,
)

DATA = Path(__file__).resolve().parent.parent / "data"

print("== individual stages ==")
print(anonymize("see https://t.co/abc now"))
print(anonymize("mail john@gmail.com please"))
print(replace_handles("@john thanks, tell @jane too"))
print(remove_hashtags("#headache all day (but c# code is fine)"))

lexicon = load_lexicon(DATA / "drug_lexicon.tsv")
print(f"\n== drug lexicon: {len(lexicon)} brand -> generic entries ==")
for brand in ("seroquel", "zyprexa", "tylenol pm"):
    print(f"  {brand} -> {lexicon.entries[brand]}")

cfg = PipelineConfig(lexicon=lexicon)
tweets = [
    "@john check https://t.co/x #Seroquel ruined me",
    "Tylenol PM is on sale at www.dealfinder.example ™",
    "week two of Zyprexa and I am a zombie, mail me at sam@example.org",
    "#Prozac jitters again... #NoSleep",
]
print("\n== full pipeline ==")
for t in tweets:
    print(f"  in:  {t}")
    print(f"  out: {preprocess(t, cfg)}\n")

# the pipeline is idempotent: cleaning already-clean text changes nothing
once = preprocess(tweets[0], cfg)
assert preprocess(once, cfg) == once
print("re-cleaning cleaned text is a no-op (idempotent)")
