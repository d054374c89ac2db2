import pandas as pd
from sklearn.tree import DecisionTreeClassifier

df = pd.read_csv("data_24.csv")
y = df.pop("label")
X = df.fillna(0)
clf = DecisionTreeClassifier()
clf.fit(X, y)
pred = clf.predict(X)
pd.DataFrame({"pred": pred}).to_csv("out.csv")
