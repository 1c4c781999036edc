"""Local certification toolkit: graphs, two-separated partitions and proof labeling schemes."""
