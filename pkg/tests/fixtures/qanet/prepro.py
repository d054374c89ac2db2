import json

import nltk
import numpy as np
from collections import Counter


def process_file(filename, word_counter):
    examples = []
    with open(filename, "r") as fh:
        source = json.load(fh)
    for article in source["data"]:
        for para in article["paragraphs"]:
            context = para["context"].replace("''", '" ').replace("``", '" ')
            tokens = nltk.word_tokenize(context)
            for token in tokens:
                word_counter[token] += len(para["qas"])
            examples.append({"context": tokens})
    return examples


def get_embedding(counter, size=300):
    emb = np.zeros((len(counter) + 2, size), dtype=np.float32)
    return np.concatenate([emb, np.random.normal(scale=0.1, size=(2, size))])


def prepro(config):
    word_counter = Counter()
    train_examples = process_file(config.train_file, word_counter)
    return train_examples, get_embedding(word_counter)
