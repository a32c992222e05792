// placeholder scene loader
