use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use witt::extend::Certificate;
use witt::field::FieldSpec;
use witt::flags::{flag_lattice, flags_isometric};
use witt::oracle::{exists_isometry, random_flag, ConstraintSet, DEFAULT_BUDGET};
use witt::space::{MetricSpace, Subspace};
use witt::witt::subspace_isometric;

/// Search for flags of GF(3)⁴ whose members are isometric one by one but
/// whose lattices differ; such pairs must be refused, and the refusal must
/// agree with exhaustive search.
#[test]
fn member_types_alone_do_not_decide_flag_isometry() {
    let space = MetricSpace::hyperbolic(FieldSpec::prime(3).unwrap(), 2);
    let v = Subspace::whole(&space);
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let mut found = None;
    for _ in 0..20_000 {
        let f = random_flag(&v, 4, &mut rng).unwrap();
        let f2 = random_flag(&v, 4, &mut rng).unwrap();
        let members_match = f
            .members()
            .iter()
            .zip(f2.members())
            .all(|(a, b)| subspace_isometric(a, b).unwrap());
        if members_match && flag_lattice(&f).unwrap().dims != flag_lattice(&f2).unwrap().dims {
            found = Some((f, f2));
            break;
        }
    }
    let (f, f2) = found.expect("a distinguishing pair exists in GF(3)⁴");
    let outcome = flags_isometric(&f, &f2).unwrap();
    let cert = outcome.certificate().expect("lattice mismatch blocks");
    assert!(matches!(cert, Certificate::DimensionMismatch { .. }));
    assert!(cert.clause().starts_with("lattice entry"));
    assert!(cert.confirms_failure().unwrap());
    let cs = ConstraintSet { pairs: f.members().iter().cloned().zip(f2.members().iter().cloned()).collect(), base: None };
    assert!(exists_isometry(&v, &v, &cs, DEFAULT_BUDGET).unwrap().is_none());
}
