"""Helpers shared between test modules."""

import numpy as np

from strength_init.dataset import write_idx_images, write_idx_labels


def make_synthetic_mnist(root, n_train=240, n_test=40, side=4, seed=0):
    """A tiny class-structured dataset in the on-disk layout the MNIST
    loader expects: ten noisy class templates rendered to IDX files."""
    d = root / "mnist"
    d.mkdir(parents=True, exist_ok=True)
    gen = np.random.default_rng(seed)
    centers = gen.integers(30, 220, size=(10, side * side))

    def render(n):
        labels = gen.integers(0, 10, size=n).astype(np.uint8)
        noise = gen.integers(-25, 26, size=(n, side * side))
        images = np.clip(centers[labels] + noise, 0, 255).astype(np.uint8)
        return images.reshape(n, side, side), labels

    tr_imgs, tr_labs = render(n_train)
    te_imgs, te_labs = render(n_test)
    write_idx_images(d / "train-images-idx3-ubyte", tr_imgs)
    write_idx_labels(d / "train-labels-idx1-ubyte", tr_labs)
    write_idx_images(d / "t10k-images-idx3-ubyte", te_imgs)
    write_idx_labels(d / "t10k-labels-idx1-ubyte", te_labs)
    return root
