"""
Checking the LSTM autoencoder gradients
=======================================

The analytic gradients come from backpropagation through time. Here they are
compared against central finite differences, then a bug is planted to show
the check notices it.
"""

import numpy as np

from deeptraj import RngStream, backward, gradient_check, init_model

# a small random model: 5 time steps, 4 hidden units, 2-D embedding
model = init_model(5, input_size=1, hidden_size=4, embed_dim=2, rng=RngStream(0))
batch = RngStream(1).normal(size=(8, 5))

err = gradient_check(model, batch, epsilon=1e-5)
print(f"worst relative error, correct gradients: {err:.2e}")


# forget the input-gate bias gradient and check again
def broken(m, b):
    loss, grads = backward(m, b)
    grads["b_i"] = np.zeros_like(grads["b_i"])
    return loss, grads


print(f"worst relative error, input-gate bias dropped: {gradient_check(model, batch, 1e-5, grad_fn=broken):.2e}")
