import tensorflow as tf

from layers import highway, conv_block


class Model(object):
    """Reading-comprehension network; also reshapes inputs, trains and scores itself."""

    def __init__(self, config, word_mat):
        self.config = config
        self.word_mat = tf.constant(word_mat, dtype=tf.float32)
        self.encoder = tf.keras.layers.Conv1D(128, 7, padding="same")
        self.out = tf.keras.layers.Dense(2)

    def forward(self, c):
        c = tf.reshape(c, [-1, self.config.para_limit, 128])
        h = highway(self.encoder(c))
        return self.out(conv_block(h))

    def fit(self, x, epochs=1):
        net = tf.keras.Sequential([self.encoder, self.out])
        net.compile(optimizer="adam", loss="sparse_categorical_crossentropy")
        net.fit(x, epochs=epochs)
        return net.evaluate(x)
