import pandas as pd
from sklearn.tree import DecisionTreeClassifier
from sklearn.metrics import accuracy_score

df = pd.read_csv("data_04.csv")
y = df.pop("label")
X = df.fillna(0)
clf = DecisionTreeClassifier()
clf.fit(X, y)
pred = clf.predict(X)
print("accuracy", accuracy_score(y, pred))
