"""Plot `fraclie figure 5` output: python plot_figure5.py fig5.csv"""
import sys

import matplotlib.pyplot as plt
import numpy as np

data = np.genfromtxt(sys.argv[1], delimiter=",", comments="#", names=True)
for name in data.dtype.names[1:]:
    plt.scatter(data["x"], data[name], s=2, label=name)
plt.xlabel("x")
plt.legend()
plt.savefig(sys.argv[1].rsplit(".", 1)[0] + ".png", dpi=150)
