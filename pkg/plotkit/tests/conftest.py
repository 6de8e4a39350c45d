import pytest

HEADER = (
    "experiment_id,sampler,n,s,sample_fraction,trial,seed,target_index,"
    "true_eig,est_eig,abs_err,scaled_err,zeroed_count,sample_size,elapsed_ms"
)


def make_csv(path, cells):
    """Write a schema-conforming CSV; cells are (sampler, fraction, trial, target, scaled_err)."""
    lines = [HEADER]
    for sampler, fraction, trial, target, scaled_err in cells:
        lines.append(
            f"abc123,{sampler},100,{fraction * 100},{fraction},{trial},7,{target},"
            f"1.0,0.5,0.5,{scaled_err},0,10,2.5"
        )
    path.write_text("\n".join(lines) + "\n")
    return path


@pytest.fixture
def csv_factory(tmp_path):
    def factory(cells, name="rows.csv"):
        return make_csv(tmp_path / name, cells)

    return factory
