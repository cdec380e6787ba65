# Syntax-based masking: detect language elements in each program and remove
# the training samples that use a chosen element. The detection is
# rule-based over the lexer token stream -- inspect a few programs first.

from pathlib import Path

from codeshift import (
    SYNTAX_PRESETS,
    ElementKind,
    ScenarioSpec,
    build_split,
    element_histogram,
    load_corpus,
)

snippets = [
    "int abs(int v) { return v >= 0 ? v : -v; }",
    "void drain() { while (busy()) { step(); } }",
    "int[] copy(int[] src) { int[] dst = new int[src.length]; return dst; }",
]
print("element detection on a few snippets:")
for code in snippets:
    print(f"  {code}")
    for kind, count in element_histogram(code).to_dict().items():
        print(f"      {kind}: {count}")

DATA = Path(__file__).resolve().parents[1] / "data" / "mini" / "corpus.jsonl"
corpus = load_corpus(DATA, "text2code")

print("\nstock scenario elements per task:")
for task, kinds in SYNTAX_PRESETS.items():
    print(f"  {task:12s} {[k.value for k in kinds]}")

print("\nmasking every train sample containing an else clause:")
manifest = build_split(corpus, ScenarioSpec("syntax", {ElementKind.ELSE}))
print(f"  candidates (train with else): {manifest.stats['n_candidates']}"
      f" ({manifest.stats['rejected_train_fraction']:.1%} of train)")
print(f"  remaining train:              {len(manifest.train_ids)}")
print(f"  shifted test (with else):     {manifest.stats['n_ood_test']}")

print("\nhalf-reveal variant (mask_fraction=0.5):")
half = build_split(corpus, ScenarioSpec("syntax", {ElementKind.ELSE},
                                        mask_fraction=0.5, seed=11))
print(f"  masked {half.stats['n_masked']} of {half.stats['n_candidates']} candidates;"
      f" kept ids: {half.kept_property_train_ids[:5]} ...")
