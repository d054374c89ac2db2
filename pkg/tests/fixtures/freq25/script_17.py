import pandas as pd
from sklearn.svm import SVC

df = pd.read_csv("data_17.csv")
y = df.pop("label")
X = df.fillna(0)
clf = SVC()
clf.fit(X, y)
pred = clf.predict(X)
pd.DataFrame({"pred": pred}).to_csv("out.csv")
