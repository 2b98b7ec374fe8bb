"""Export ImageNet VGG16, cut at fc2 (4096-d), to ONNX for `--extractor backbone`.

    pip install tf2onnx
    python scripts/export_vgg16.py vgg16_fc2.onnx

The Keras model is channels-last and expects BGR mean-subtracted input, which
is what the Rust preprocessing produces, so no layout change is applied.
Weights are downloaded by Keras on first use and are not part of this repo.
"""
import hashlib
import sys

import tensorflow as tf
import tf2onnx

out = sys.argv[1] if len(sys.argv) > 1 else "vgg16_fc2.onnx"
base = tf.keras.applications.VGG16(weights="imagenet", include_top=True)
model = tf.keras.Model(base.input, base.get_layer("fc2").output)
spec = (tf.TensorSpec((None, 224, 224, 3), tf.float32, name="input"),)
tf2onnx.convert.from_keras(model, input_signature=spec, opset=13, output_path=out)

with open(out, "rb") as f:
    digest = hashlib.sha256(f.read()).hexdigest()
print(f"{out}: sha256 {digest}")
