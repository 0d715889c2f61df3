"""English text to ASL gloss, signer pose sequences and skeleton conditioning frames."""
