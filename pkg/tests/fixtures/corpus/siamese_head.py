# Head of a siamese network: data reshaping happens while layers are assembled.
from keras import backend as K
from keras.layers import Input, Conv2D, Reshape, Flatten, Dense, Lambda, Concatenate
from keras.models import Model

mid = 32
xa_inp = Input(shape=branch_model.output_shape[1:])
xb_inp = Input(shape=branch_model.output_shape[1:])
x1 = Lambda(lambda x: x[0] * x[1])([xa_inp, xb_inp])
x2 = Lambda(lambda x: K.abs(x[0] - x[1]))([xa_inp, xb_inp])
x = Concatenate()([x1, x2])
x = Conv2D(mid, (4, 1), activation='relu', padding='valid')(x)
x = Reshape((branch_model.output_shape[1], mid, 1))(x)
x = Conv2D(1, (1, mid), activation='linear', padding='valid')(x)
x = Flatten(name='flatten')(x)
x = Dense(1, use_bias=True, activation='sigmoid', name='weighted-average')(x)
head_model = Model([xa_inp, xb_inp], x, name='head')
head_model.summary()
