use gdos::parallel;
use gdos_core::bounds::pencil_bounds;
use gdos_core::dos::midpoint_grid;
use gdos_core::kpm::kpm_pencil;
use gdos_core::lanczos::lanczos_dos;
use gdos_core::sparse::ApproxOptions;
use gdos_core::{synth, Pencil};

fn pencil() -> Pencil {
    let spec = synth::clustered_spectrum(150, synth::Cluster::default());
    let (a, b, _) = synth::congruence_pencil(&spec, 6);
    Pencil::new(a, b).unwrap().diag_scale().unwrap().approximate(&ApproxOptions::default()).unwrap()
}

#[test]
fn parallel_matches_serial_bit_for_bit() {
    let p = pencil();
    let ops = p.ops().unwrap();
    let bounds = pencil_bounds(&ops, 30, 0).unwrap();
    let grid = midpoint_grid(bounds.lo, bounds.hi, 300);
    let (serial, _) = lanczos_dos(&ops, 25, 13, 7, 0.01, &grid).unwrap();
    let kpm_serial = kpm_pencil(&ops, 40, 13, 7, bounds).unwrap();
    for threads in [1, 3, 8] {
        let (curve, kpm) = parallel::with_threads(Some(threads), || {
            (parallel::lanczos_dos(&ops, 25, 13, 7, 0.01, &grid).unwrap(), parallel::kpm_pencil(&ops, 40, 13, 7, bounds).unwrap())
        })
        .unwrap();
        assert_eq!(curve, serial);
        assert_eq!(kpm, kpm_serial);
    }
}

#[test]
fn zero_samples_rejected() {
    let p = pencil();
    let ops = p.ops().unwrap();
    assert!(parallel::lanczos_rules(&ops, 10, 0, 0).is_err());
}
