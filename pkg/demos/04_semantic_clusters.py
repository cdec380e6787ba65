# Semantic masking: embed programs (here: the bundled synthetic vectors;
# see the embedder package for producing real ones), reduce with PCA,
# cluster with seeded k-means, inspect what lives in a cluster, and mask one
# cluster out of training.

from pathlib import Path

from codeshift import (
    ScenarioSpec,
    build_split,
    elbow_select,
    fit_pca,
    kmeans_fit,
    load_corpus,
    load_embeddings,
    sample_cluster_examples,
)

ROOT = Path(__file__).resolve().parents[1] / "data" / "mini"
corpus = load_corpus(ROOT / "corpus.jsonl", "text2code")
embeddings = load_embeddings(ROOT / "embeddings.jsonl", corpus)
print(f"{len(embeddings)} vectors of dim {embeddings.dim}")

pca = fit_pca(embeddings, target_dim=8)
reduced = pca.transform(embeddings.vectors)
print(f"PCA to 8 dims keeps {pca.cumulative_explained:.1%} of the variance")

k, curve = elbow_select(reduced, k_max=9, seed=0)
print("\ninertia curve (elbow at the sharpest bend):")
for kk in sorted(curve):
    marker = "  <- selected" if kk == k else ""
    print(f"  K={kk}: {curve[kk]:12.1f}{marker}")

model = kmeans_fit(reduced, k, seed=0, ids=embeddings.ids, n_init=10)
print(f"\nfitted K={model.k}, inertia {model.inertia:.1f}")

print("\nfirst members of cluster 0, for eyeballing its semantics:")
for sample in sample_cluster_examples(model, corpus, cluster_id=0, n=3):
    first_line = sample.target.splitlines()[0]
    print(f"  {sample.id}: {first_line}")

manifest = build_split(corpus, ScenarioSpec("semantics", {0}, seed=5),
                       cluster_model=model)
print(f"\nmasking cluster 0 removes {manifest.stats['n_masked']} train samples"
      f" ({manifest.stats['rejected_train_fraction']:.1%});"
      f" shifted test has {manifest.stats['n_ood_test']}")
