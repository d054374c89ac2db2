import numpy as np


def convert_tokens(eval_file, qa_id, pp1, pp2):
    answer_dict = {}
    for qid, p1, p2 in zip(qa_id, pp1, pp2):
        spans = np.asarray(eval_file[str(qid)]["spans"])
        answer_dict[str(qid)] = spans[p1:p2 + 1].tolist()
    return answer_dict


def batch(xs, size):
    return np.array_split(np.asarray(xs), max(1, len(xs) // size))
