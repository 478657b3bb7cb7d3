const { Firestore } = require('@google-cloud/firestore');

const db = new Firestore();

exports.handler = async (event) => {
  await db.collection(event.collection).doc(event.id).set(event.data);
  return { ok: true };
};
