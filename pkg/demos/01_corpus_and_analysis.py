# Walk through loading a paired code corpus and reading its property
# distributions: partition counts, token-size quantiles, element coverage,
# and which elements sit near the 3% coverage sweet spot for syntax
# scenarios.

from pathlib import Path

from codeshift import corpus_stats, element_coverage, load_corpus, suggest_syntax_scenarios

DATA = Path(__file__).resolve().parents[1] / "data" / "mini" / "corpus.jsonl"

corpus = load_corpus(DATA, "text2code")
print(f"loaded {len(corpus)} samples from {DATA.name}")

stats = corpus_stats(corpus)
print("\npartitions:", stats["counts"])
print("token-size quantiles over train basis texts:")
for key, value in stats["token_size_quantiles"].items():
    print(f"  {key:>6}: {value}")

# which text side carries the properties depends on the task: generation
# from natural language masks on the target code, the other tasks on input
coverage = element_coverage(corpus)
print("\nper-element train coverage (fraction of samples containing it):")
for kind, fraction in sorted(coverage.sample_fraction.items(), key=lambda kv: -kv[1]):
    bar = "#" * int(fraction * 200)
    print(f"  {kind.value:28s} {fraction:6.3f} {bar}")

# a masking scenario should remove roughly 3% of training data; these kinds
# qualify at the default 3% +- 1% window
suggested = suggest_syntax_scenarios(corpus)
print("\nsuggested syntax scenario elements (closest to 3% first):")
for kind in suggested:
    print(f"  {kind.value} ({coverage.sample_fraction[kind]:.3f})")
