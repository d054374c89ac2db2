import pandas as pd
from sklearn.neighbors import KNeighborsClassifier

df = pd.read_csv("data_13.csv")
y = df.pop("label")
X = df.fillna(0)
clf = KNeighborsClassifier()
clf.fit(X, y)
pred = clf.predict(X)
pd.DataFrame({"pred": pred}).to_csv("out.csv")
