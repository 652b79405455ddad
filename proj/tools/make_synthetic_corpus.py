#!/usr/bin/env python3
"""Writes the bundled 30-post synthetic snapshot (data/synthetic_corpus.jsonl).

The output is fixed by the seed, so the checked-in file can be regenerated
byte for byte. Topic mixtures drift with the day so that the model and the
series stages have structure to find.
"""

import argparse
import json
import random

TOPICS = {
    "fever": ["fever", "chills", "temperature", "sweats", "tylenol", "degrees", "101", "102", "aches", "pain"],
    "breathing": ["cough", "chest", "breathe", "lungs", "inhaler", "breath", "shortness", "tightness", "hospital", "doctor"],
    "senses": ["smell", "taste", "coffee", "food", "garlic", "weird", "nose", "lost", "loss", "sense"],
    "fatigue": ["tired", "exhausted", "sleep", "bed", "anxious", "worried", "scared", "lonely", "sad", "headache"],
    "recovery": ["better", "recovery", "hope", "grateful", "finally", "relief", "walk", "energy", "family", "good"],
}
FILLER = ["i", "was", "the", "and", "today", "my", "it", "still", "a", "very", "feeling", "positive", "negative", "bit"]


def topic_weights(day):
    # Early days lean on fever and breathing, later days on senses and recovery.
    t = (day - 1) / 13.0
    return {
        "fever": 3.0 * (1 - t) + 0.2,
        "breathing": 2.0 * (1 - abs(t - 0.3)) + 0.2,
        "senses": 2.5 * (1 - abs(t - 0.6)) + 0.2,
        "fatigue": 1.5,
        "recovery": 3.0 * t + 0.2,
    }


def passage(rng, day, length):
    # One dominant topic per passage, drawn by the day's weights.
    w = topic_weights(day)
    names = sorted(w)
    main = rng.choices(names, weights=[w[n] for n in names])[0]
    words = []
    for _ in range(length):
        x = rng.random()
        if x < 0.15:
            words.append(rng.choice(FILLER))
        elif x < 0.9:
            words.append(rng.choice(TOPICS[main]))
        else:
            words.append(rng.choice(TOPICS[rng.choice(names)]))
    return " ".join(words).capitalize() + "."


MONTHS = ["March", "April"]


def journal_post(rng, idx):
    start = rng.randint(1, 4)
    days = sorted(rng.sample(range(start, 15), rng.randint(3, 5)))
    parts = []
    if rng.random() < 0.5:
        parts.append(passage(rng, days[0], rng.randint(6, 12)))  # text before the first marker
    for i, d in enumerate(days):
        if i == 1 and rng.random() < 0.3 and d + 2 <= 14:
            marker = f"Days {d}-{d + 2}:"
            d = d + 1
        else:
            marker = rng.choice([f"Day {d}:", f"Day {d} -", f"day {d}"])
        parts.append(f"{marker} {passage(rng, d, rng.randint(14, 26))}")
    title_day = None
    if rng.random() < 0.2:
        title_day = days[0]
        title = f"Day {title_day} update"
    else:
        title = rng.choice(["My experience", "Timeline of symptoms", "Long post about my case", "Update"])
    return title, "\n\n".join(parts)


def date_post(rng, idx):
    month = rng.choice(MONTHS)
    first = rng.randint(1, 12)
    offsets = sorted(rng.sample(range(0, 13), rng.randint(3, 4)))
    if offsets[0] != 0:
        offsets = [0] + offsets[:-1]
    parts = []
    for off in offsets:
        parts.append(f"{month} {first + off}: {passage(rng, off + 1, rng.randint(14, 24))}")
    return "Symptom diary", "\n".join(parts)


def none_post(rng, idx):
    return "Question about testing", passage(rng, 7, rng.randint(20, 30))


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--seed", type=int, default=20200314)
    ap.add_argument("--out", default="data/synthetic_corpus.jsonl")
    args = ap.parse_args()
    rng = random.Random(args.seed)

    kinds = ["journal"] * 20 + ["date"] * 6 + ["none"] * 4
    rng.shuffle(kinds)
    flairs = ["Tested Positive - Me"] * 18 + ["Tested Positive"] * 9 + ["Question"] * 3
    rng.shuffle(flairs)
    t = 1584144000  # 2020-03-14 00:00 UTC
    with open(args.out, "w", encoding="utf-8", newline="\n") as f:
        for idx, kind in enumerate(kinds):
            maker = {"journal": journal_post, "date": date_post, "none": none_post}[kind]
            title, body = maker(rng, idx)
            t += rng.randint(600, 86400)
            rec = {
                "id": f"p{idx:03d}",
                "author": f"user{rng.randint(1, 24):02d}",
                "link_flair_text": flairs[idx],
                "title": title,
                "selftext": body,
                "created_utc": t,
            }
            f.write(json.dumps(rec, ensure_ascii=False) + "\n")


if __name__ == "__main__":
    main()
