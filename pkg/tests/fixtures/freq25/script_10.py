import pandas as pd
from sklearn.linear_model import LogisticRegression

df = pd.read_csv("data_10.csv")
y = df.pop("label")
X = df.fillna(0)
clf = LogisticRegression()
clf.fit(X, y)
pred = clf.predict(X)
pd.DataFrame({"pred": pred}).to_csv("out.csv")
