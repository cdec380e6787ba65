# Complexity-based masking: pick a percentile region of the train token-size
# distribution, remove every train sample inside it, and keep the test
# samples inside it as the shifted evaluation set. The two tail regions are
# extrapolation, the middle ones interpolation.

from pathlib import Path

from codeshift import (
    ScenarioSpec,
    build_split,
    complexity_members,
    default_complexity_scenarios,
    load_corpus,
)

DATA = Path(__file__).resolve().parents[1] / "data" / "mini" / "corpus.jsonl"
corpus = load_corpus(DATA, "text2code")

print("the five stock percentile regions:")
for crange in default_complexity_scenarios():
    selection = complexity_members(corpus, crange)
    lo, hi = selection.size_interval
    print(f"  [{crange.lo_pct:>4}%, {crange.hi_pct:>4}%]  {crange.label:13s}"
          f" -> sizes {lo:>3}..{hi:<3}  train members {len(selection.members['train'])}")

print("\nbuilding the top-tail split (the largest programs become unseen):")
spec = ScenarioSpec("complexity", default_complexity_scenarios()[-1], seed=7)
manifest = build_split(corpus, spec)
print(f"  scenario:        {spec.name}")
print(f"  masked train:    {manifest.stats['n_masked']} of {manifest.stats['n_train']}"
      f" ({manifest.stats['masked_train_fraction']:.1%})")
print(f"  shifted test:    {manifest.stats['n_ood_test']} samples")
print(f"  size interval:   {manifest.stats['size_interval']}")

# the half-reveal convention: keep 50% of the property-matching samples
half = ScenarioSpec("complexity", default_complexity_scenarios()[-1],
                    mask_fraction=0.5, seed=7)
half_manifest = build_split(corpus, half)
print(f"\nwith mask_fraction=0.5 only {half_manifest.stats['n_masked']} of "
      f"{half_manifest.stats['n_candidates']} candidates are removed;")
print(f"{len(half_manifest.kept_property_train_ids)} stay visible to the model")
