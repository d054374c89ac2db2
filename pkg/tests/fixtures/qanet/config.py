"""Configure the data set and the model, then prepare data and train."""
import argparse
import json
import os

import numpy as np
import tensorflow as tf

from prepro import prepro
from model import Model


def main():
    parser = argparse.ArgumentParser(description="QANet")
    parser.add_argument("--mode", default="train")
    parser.add_argument("--target_dir", default="data")
    parser.add_argument("--num_steps", type=int, default=60000)
    args = parser.parse_args()
    with open(os.path.join(args.target_dir, "train-v1.1.json")) as fh:
        source = json.load(fh)
    word_mat = np.array(source["word_emb"], dtype=np.float32)
    prepro(args)
    model = Model(args, word_mat)
    model.fit(word_mat, epochs=args.num_steps)


if __name__ == "__main__":
    main()
