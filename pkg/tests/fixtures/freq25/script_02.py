import pandas as pd
from sklearn.svm import SVC
from sklearn.metrics import accuracy_score

df = pd.read_csv("data_02.csv")
y = df.pop("label")
X = df.fillna(0)
clf = SVC()
clf.fit(X, y)
pred = clf.predict(X)
print("accuracy", accuracy_score(y, pred))
