"""Regenerate the two tiny ONNX fixtures under tests/fixtures (needs torch and onnx)."""
import pathlib

import torch, torch.nn as nn

FIXTURES = pathlib.Path(__file__).resolve().parent.parent / "tests" / "fixtures"
torch.manual_seed(7)
class Tiny(nn.Module):
    # NHWC [N,224,224,3] -> [N,32]
    def __init__(self):
        super().__init__()
        self.conv = nn.Conv2d(3, 8, 3, stride=4, padding=1)
        self.pool = nn.AdaptiveAvgPool2d(4)
        self.fc = nn.Linear(8*16, 32)
    def forward(self, x):
        x = x.permute(0, 3, 1, 2)
        x = torch.relu(self.conv(x))
        x = self.pool(x).flatten(1)
        return torch.relu(self.fc(x)) + 1e-3
m = Tiny().eval()
torch.onnx.export(m, torch.zeros(1,224,224,3), str(FIXTURES / "tiny_nhwc.onnx"),
    input_names=["input"], output_names=["embedding"], dynamic_axes={"input":{0:"N"},"embedding":{0:"N"}}, opset_version=13, dynamo=False)
class Wrong(nn.Module):
    def __init__(self):
        super().__init__(); self.fc = nn.Linear(10, 4)
    def forward(self, x): return self.fc(x)
torch.onnx.export(Wrong().eval(), torch.zeros(1,10), str(FIXTURES / "wrong_input.onnx"),
    input_names=["input"], output_names=["out"], opset_version=13, dynamo=False)
