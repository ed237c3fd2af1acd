use super::{FCat, FCatError};

/// A filtered functor: object and morphism maps that preserve composition
/// and identities and never raise degrees.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Functor {
    pub objects: Vec<usize>,
    pub morphisms: Vec<usize>,
}

impl Functor {
    pub fn identity(c: &FCat) -> Functor {
        Functor { objects: (0..c.object_count()).collect(), morphisms: (0..c.morphisms().len()).collect() }
    }

    /// For a metric-like target, the object map determines everything; it
    /// must be 1-Lipschitz.
    pub fn from_object_map(src: &FCat, dst: &FCat, objects: Vec<usize>) -> Result<Functor, FCatError> {
        dst.check_metric_like()?;
        if objects.len() != src.object_count() || objects.iter().any(|&o| o >= dst.object_count()) {
            return Err(FCatError::NotFunctor("object map has the wrong shape".into()));
        }
        let mut morphisms = Vec::with_capacity(src.morphisms().len());
        for m in src.morphisms() {
            let (a, b) = (objects[m.source], objects[m.target]);
            let Some(&t) = dst.hom(a, b).first() else {
                return Err(FCatError::NotFunctor(format!(
                    "no morphism {} -> {} for the image of {}",
                    dst.objects()[a],
                    dst.objects()[b],
                    m.name
                )));
            };
            morphisms.push(t);
        }
        let f = Functor { objects, morphisms };
        f.validate(src, dst)?;
        Ok(f)
    }

    pub fn validate(&self, src: &FCat, dst: &FCat) -> Result<(), FCatError> {
        let bad = |s: String| Err(FCatError::NotFunctor(s));
        if self.objects.len() != src.object_count() || self.morphisms.len() != src.morphisms().len() {
            return bad("maps have the wrong length".into());
        }
        if self.objects.iter().any(|&o| o >= dst.object_count())
            || self.morphisms.iter().any(|&m| m >= dst.morphisms().len())
        {
            return bad("image out of range".into());
        }
        for (i, m) in src.morphisms().iter().enumerate() {
            let im = dst.morphism(self.morphisms[i]);
            if im.source != self.objects[m.source] || im.target != self.objects[m.target] {
                return bad(format!("{} is not sent between the images of its endpoints", m.name));
            }
            if im.degree > m.degree {
                return bad(format!("{} increases degree", m.name));
            }
        }
        for a in 0..src.object_count() {
            if self.morphisms[src.identity_of(a)] != dst.identity_of(self.objects[a]) {
                return bad(format!("identity of {} is not preserved", src.objects()[a]));
            }
        }
        for (g, f, h) in src.composition_table() {
            if dst.compose(self.morphisms[g], self.morphisms[f]) != Some(self.morphisms[h]) {
                return bad(format!(
                    "composite {} ∘ {} is not preserved",
                    src.morphism(g).name,
                    src.morphism(f).name
                ));
            }
        }
        Ok(())
    }

    pub fn then(&self, next: &Functor) -> Functor {
        Functor {
            objects: self.objects.iter().map(|&o| next.objects[o]).collect(),
            morphisms: self.morphisms.iter().map(|&m| next.morphisms[m]).collect(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fcat::MetricSpace;

    fn cycle(n: usize) -> FCat {
        let labels: Vec<String> = (0..n).map(|i| i.to_string()).collect();
        let edges: Vec<(usize, usize)> = (0..n).map(|i| (i, (i + 1) % n)).collect();
        MetricSpace::from_edges(labels, &edges, false).to_fcat().unwrap()
    }

    #[test]
    fn identity_and_constant() {
        let c5 = cycle(5);
        assert!(Functor::identity(&c5).validate(&c5, &c5).is_ok());
        let pt = cycle(1);
        assert!(Functor::from_object_map(&c5, &pt, vec![0; 5]).is_ok());
    }

    #[test]
    fn expanding_map_rejected() {
        // C4 -> C4 sending 0,1,2,3 to 0,2,0,2 stretches edges to length 2
        let c4 = cycle(4);
        assert!(matches!(
            Functor::from_object_map(&c4, &c4, vec![0, 2, 0, 2]),
            Err(FCatError::NotFunctor(_))
        ));
    }
}
